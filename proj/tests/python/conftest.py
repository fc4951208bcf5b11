import sys
from pathlib import Path

# import larsim from the source tree; the build drops _core next to it
sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "python"))
