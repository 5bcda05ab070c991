from . import (
    common, main,
)
