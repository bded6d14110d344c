"""
config.settings package.
Import the appropriate sub-module via DJANGO_SETTINGS_MODULE.
"""
