import sys

# === Module Imports ===
from modules.cli import main

# =========================================================
# ENTRY POINT
# =========================================================
if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
