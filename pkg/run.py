#!/usr/bin/env python3
"""
Development entry point for Parameter-Free SCO
"""

import os
import sys

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from paramfree_sco.main import main

if __name__ == "__main__":
    sys.exit(main())
