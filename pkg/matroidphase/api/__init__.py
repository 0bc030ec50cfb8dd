"""
API package
"""

from matroidphase.api.routes import router

__all__ = ["router"]
