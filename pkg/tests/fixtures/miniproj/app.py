"""Application wiring."""

from bolt import AsyncBolt, open_channel

APP_NAME = "miniproj"


def make_handler(bolt_conn, version=3):
    """Build a handler from a connection."""
    return bolt_conn.get_handler(version)
