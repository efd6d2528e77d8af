# services/__init__.py
# Module-level settings below are read with os.getenv at import time, so .env
# has to be applied before any of them loads. Existing variables win.
from dotenv import find_dotenv, load_dotenv

load_dotenv(find_dotenv(usecwd=True))
