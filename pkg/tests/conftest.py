import os
import sys

# lets test modules import the brute-force oracles as a plain module
sys.path.insert(0, os.path.dirname(__file__))
