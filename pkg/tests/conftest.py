import sys
from pathlib import Path

# Make sibling test helpers (oracles, synth, caption_fixtures) importable.
sys.path.insert(0, str(Path(__file__).parent))
