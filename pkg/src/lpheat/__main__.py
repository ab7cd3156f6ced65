"""Allow ``python -m lpheat``."""
from .cli import main

main()
