"""
apps package – top-level container for all Django applications.
"""
