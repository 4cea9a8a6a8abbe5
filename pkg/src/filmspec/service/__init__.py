"""FastAPI front end; `app` is the ASGI entry point."""

from .app import app

__all__ = ["app"]
