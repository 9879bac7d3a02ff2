"""
wdrw engine modules
"""
