"""Utility helpers."""


class Outer:
    """Container for nested helpers."""

    class Inner:
        """Innermost marker type."""

        def ping(self):
            """Return a liveness marker."""
            return "pong"

    def describe(self):
        """Describe the outer container."""

        def fmt(tag):
            return "outer[" + tag + "]"

        return fmt("x")
