"""
Tests for the JSON API
"""
import unittest

from app import app

AS_TEXT = """# wdrw-format 1
etale p=2 n=1 rank=2 P=1
mul s2 s2 = s2 + X1*s1
lift X1 -> 4*X1^3 - 3*X1^2
lift s2 -> s2^2 - 2*X1*s2
precision 4
"""


class TestHealth(unittest.TestCase):
    def setUp(self):
        app.config['TESTING'] = True
        self.client = app.test_client()

    def test_health(self):
        response = self.client.get('/health')
        self.assertEqual(response.status_code, 200)
        payload = response.get_json()
        self.assertEqual(payload['service'], 'wdrw')
        self.assertIn(payload['status'], ('healthy', 'degraded'))
        self.assertTrue(payload['ready'])

    def test_ready(self):
        response = self.client.get('/ready')
        self.assertEqual(response.status_code, 200)

    def test_request_id_is_echoed(self):
        response = self.client.get('/health', headers={'X-Request-ID': 'req_test'})
        self.assertEqual(response.headers['X-Request-ID'], 'req_test')

    def test_not_found(self):
        response = self.client.get('/api/nothing')
        self.assertEqual(response.status_code, 404)
        payload = response.get_json()
        self.assertFalse(payload['success'])
        self.assertEqual(payload['error']['code'], 'NOT_FOUND')
        self.assertIn('request_id', payload)

    def test_method_not_allowed(self):
        response = self.client.get('/api/eval')
        self.assertEqual(response.status_code, 405)
        self.assertEqual(response.get_json()['error']['code'], 'METHOD_NOT_ALLOWED')


class TestEngineRoutes(unittest.TestCase):
    def setUp(self):
        app.config['TESTING'] = True
        self.client = app.test_client()

    def post(self, path, body):
        return self.client.post(path, json=body)

    def test_eval(self):
        response = self.post('/api/eval', {'term': '(+ (teich X1) (teich X1))', 'prime': 2, 'vars': 1, 'len': 2})
        self.assertEqual(response.status_code, 200)
        payload = response.get_json()
        self.assertTrue(payload['success'])
        self.assertEqual(payload['terms'][0]['eta'], 2)
        self.assertEqual(payload['terms'][0]['coeff'], 1)

    def test_missing_term(self):
        response = self.post('/api/eval', {'prime': 2})
        self.assertEqual(response.status_code, 400)
        self.assertEqual(response.get_json()['error']['details'], {'field': 'term'})

    def test_body_must_be_json_object(self):
        response = self.client.post('/api/eval', data='term', content_type='text/plain')
        self.assertEqual(response.status_code, 400)
        self.assertEqual(response.get_json()['error']['code'], 'BAD_REQUEST')

    def test_syntax_error_is_400(self):
        response = self.post('/api/eval', {'term': '(teich X1'})
        self.assertEqual(response.status_code, 400)
        error = response.get_json()['error']
        self.assertEqual(error['code'], 'syntax_error')
        self.assertIn('position', error['details'])

    def test_integer_fields_are_validated(self):
        response = self.post('/api/eval', {'term': '(teich X1)', 'prime': 'two'})
        self.assertEqual(response.status_code, 400)
        self.assertEqual(response.get_json()['error']['code'], 'config_error')

    def test_zeta(self):
        response = self.post('/api/zeta', {'term': '(V (teich X1))', 'eps': '1/4'})
        payload = response.get_json()
        self.assertEqual(payload['zeta'], '7/8')
        self.assertEqual(payload['minimizer'], 'e(1; 1/2; {})')

    def test_gamma(self):
        response = self.post('/api/gamma', {'term': '(V (teich X1))', 'eps': '1/4'})
        payload = response.get_json()
        self.assertEqual(payload['gamma'], '7/8')
        self.assertTrue(payload['exact'])

    def test_lazard(self):
        response = self.post('/api/lazard', {'poly': 'X1', 'len': 3, 'lift': 'lift p=2 X1 -> X1^2 + 2*X1'})
        payload = response.get_json()
        self.assertEqual(response.status_code, 200)
        self.assertEqual(payload['t_F']['coords'], ['X1', 'X1', 'X1^3 + X1^2 + X1'])

    def test_witt_presentation(self):
        response = self.post('/api/witt', {'presentation': AS_TEXT, 'term': '(teich s2)'})
        payload = response.get_json()
        self.assertEqual(response.status_code, 200)
        self.assertTrue(payload['ok'])
        self.assertEqual(payload['det'], '1')
        self.assertEqual(payload['constants']['delta'], '1/2')
        self.assertEqual(payload['basis_parts'][1]['coords'], ['1', '0'])
        self.assertTrue(payload['overconvergent']['recomposes'])

    def test_check(self):
        response = self.post('/api/check', {'suite': 'oracle', 'samples': 2})
        payload = response.get_json()
        self.assertEqual(response.status_code, 200)
        self.assertTrue(payload['passed'])
        self.assertTrue(payload['success'])


if __name__ == '__main__':
    unittest.main()
