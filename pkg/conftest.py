"""
conftest.py
-----------
Marks the repository root for pytest so that `assertloom` and `cli` import
from the working tree. The suites themselves are plain unittest modules.
"""
