"""
Simple script to run the wdrw API server
"""
import os

from app import app
from modules.settings import get_settings

if __name__ == '__main__':
    port = int(os.getenv('PORT', '5000'))
    settings = get_settings()
    print("\n" + "="*60)
    print("Starting wdrw API Server")
    print("="*60)
    print(f"Server running at: http://localhost:{port}")
    print(f"API Documentation: http://localhost:{port}/apidocs")
    print(f"Defaults: p={settings.prime} n={settings.n_vars} m={settings.length}")
    print("="*60 + "\n")
    app.run(host='0.0.0.0', port=port, debug=settings.debug)
