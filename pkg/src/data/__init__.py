# Empty __init__.py file for Python package
