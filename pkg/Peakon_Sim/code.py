# This is where the simulator starts.
# python code.py <run|study|check> [options]

"""
Peakon Simulator
Version: 1.0.0
"""

import sys
import traceback

print("=" * 70, file=sys.stderr)
print("Peakon Simulator Version: 1.0.0", file=sys.stderr)
print("mCH peakons: sticky, non-conservative, regularized; CH", file=sys.stderr)
print("=" * 70, file=sys.stderr)

try:
    import main

    main.cli()

except SystemExit:
    raise
except Exception as e:
    print("".join(traceback.format_exception(e)), file=sys.stderr)
    sys.exit(1)
