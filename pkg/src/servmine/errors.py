"""Exception hierarchy shared by every servmine module."""


class ServMineError(Exception):
    """Base class for all servmine errors."""


class InvalidArgument(ServMineError, ValueError):
    pass


class InvalidConfig(ServMineError, ValueError):
    pass


class InvalidRepository(ServMineError, ValueError):
    pass


class InvalidState(ServMineError, RuntimeError):
    pass
