"""
config package – makes config a Python package so that
`config.settings.base` etc. are importable.
"""
