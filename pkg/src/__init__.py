# ecrt-stream - sequential conditional independence testing
"""
ecrt-stream runs an anytime-valid conditional independence test over a stream
of (x, y, z) observations. Evidence accumulates in a wealth process built from
betting scores against dummy features drawn from P(X | Z); the test stops as
soon as the wealth crosses 1/alpha.
"""

__version__ = "0.1.0"
