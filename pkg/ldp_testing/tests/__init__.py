"""
ldp_testing Test Cases. Run entire suite by:

python3 -m unittest

Run individual test class by:

python3 -m unittest ldp_testing.tests.mechanisms.test_channels
"""
