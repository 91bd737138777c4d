"""Bolt protocol drivers for asynchronous scenarios."""


class AsyncBolt3:
    """Asynchronous Bolt 3 driver."""

    def run(self, statement):
        """Execute a statement asynchronously."""
        return statement


class Helper:
    """Support utilities for drivers."""

    def assist(self):
        """Provide assistance."""
        return True
