import os
import sys

# Add the current directory to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from rtsurgery.cli import main

if __name__ == '__main__':
    sys.exit(main())
