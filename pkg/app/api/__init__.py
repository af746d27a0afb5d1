"""
API Module
Contains all API endpoints and routers.
"""
