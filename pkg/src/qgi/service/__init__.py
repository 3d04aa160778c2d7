"""HTTP layer: pydantic request/response models and the FastAPI app."""

from .app import create_app

__all__ = ["create_app"]
