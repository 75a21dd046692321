import os

# =========================================================
# SEGMENT LIMITS
# =========================================================
SEGMENT_CAP = int(os.getenv("CUBE_SEGMENT_CAP", "1000000"))

# =========================================================
# ORACLE LIMITS
# =========================================================
ORACLE_BUDGET = int(os.getenv("CUBE_ORACLE_BUDGET", "100000000"))
ORACLE_CHUNK  = int(os.getenv("CUBE_ORACLE_CHUNK",  "20000"))
WITNESS_CAP   = int(os.getenv("CUBE_WITNESS_CAP",   "16"))

# =========================================================
# REPORTING
# =========================================================
TRACE_POINTS_LIMIT = int(os.getenv("CUBE_TRACE_POINTS_LIMIT", "64"))
LOG_LEVEL          = os.getenv("CUBE_LOG_LEVEL", "WARNING")
