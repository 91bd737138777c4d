"""Client entry points."""


def open_session():
    """Open an asynchronous session driver."""
    pass
