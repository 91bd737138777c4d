"""Protocol handler registry."""

DEFAULT_PORT = 7687


class AsyncBolt:
    """Asynchronous Bolt connection."""

    protocol_versions = (3, 4)

    def get_handler(self, protocol_version):
        """Return Bolt protocol handlers"""
        return (self, protocol_version)


def open_channel(address, timeout=5):
    """Open a channel to a Bolt address."""
    retries = 3
    return (address, timeout, retries)
