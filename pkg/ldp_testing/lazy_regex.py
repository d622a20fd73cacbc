import regex


class LazyPattern:
    """
    Regex that is compiled the first time it is used.

    Module-level patterns for instance specs and sample files are only needed
    by the CLI and harness, so importing the library does not pay for them.
    """

    __slots__ = ('pattern', 'flags', '_compiled')

    def __init__(self, pattern: str, flags: int = 0) -> None:
        self.pattern = pattern
        self.flags = flags
        self._compiled: regex.Pattern | None = None

    @property
    def compiled(self) -> regex.Pattern:
        if self._compiled is None:
            self._compiled = regex.compile(self.pattern, self.flags)
        return self._compiled

    def __getattr__(self, attribute: str):
        # only reached for names not on the wrapper: match, fullmatch, search, ...
        if attribute.startswith('_'):
            raise AttributeError(attribute)
        return getattr(self.compiled, attribute)

    def __repr__(self) -> str:
        return f'LazyPattern({self.pattern!r})'


__all__ = (
    'LazyPattern',
)
