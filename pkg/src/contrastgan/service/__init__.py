"""Read-only inference service and image transport codec."""

from .app import create_app
from .codec import b64_to_image, image_to_b64, image_to_png16, png16_to_image

__all__ = ["create_app", "image_to_png16", "png16_to_image", "image_to_b64", "b64_to_image"]
