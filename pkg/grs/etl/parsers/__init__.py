from grs.etl.parsers.algebra_parser import AlgebraParser, parse_group_spec
from grs.etl.parsers.base import BaseParser, ParseResult
from grs.etl.parsers.space_parser import LoadedSpace, SpaceParser, load_space, load_space_file

__all__ = [
    "AlgebraParser",
    "BaseParser",
    "LoadedSpace",
    "ParseResult",
    "SpaceParser",
    "load_space",
    "load_space_file",
    "parse_group_spec",
]
