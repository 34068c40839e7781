"""Test suite; run with pytest or `python -m block_ivp.tests.test_runner`"""
