# Configuration module for the SOD calculus

import os
from typing import List, Optional, Tuple

import psutil
from dotenv import load_dotenv

load_dotenv()

class Config:
    """Configuration settings for replays, sweeps and the HTTP service"""

    # Determinism: the engine never reads this, only generated-script tests do
    SEED = int(os.environ.get('SODCALC_SEED', 0))

    # Logging
    LOG_LEVEL = os.environ.get('SODCALC_LOG_LEVEL', 'INFO')
    LOG_DIR = os.environ.get('SODCALC_LOG_DIR', './logs')

    # Sweep defaults
    JOBS = int(os.environ.get('SODCALC_JOBS', 1))
    SWEEP_N = os.environ.get('SODCALC_SWEEP_N', '2..5')
    SWEEP_D = os.environ.get('SODCALC_SWEEP_D', '1..3')
    SWEEP_M_MAX = int(os.environ.get('SODCALC_SWEEP_M_MAX', 12))
    CROSSCHECK_SPAN = os.environ.get('SODCALC_CROSSCHECK_SPAN', 'm')
    FAULTS_PER_CELL = int(os.environ.get('SODCALC_FAULTS_PER_CELL', 100))

    # Search and parser limits
    EQUIV_SEARCH_LIMIT = int(os.environ.get('SODCALC_EQUIV_SEARCH_LIMIT', 20000))
    MAX_SCRIPT_BYTES = int(os.environ.get('SODCALC_MAX_SCRIPT_BYTES', 1024 * 1024))

    # HTTP service
    PORT = int(os.environ.get('PORT', 5000))
    FLASK_DEBUG = os.environ.get('FLASK_DEBUG', 'False').lower() == 'true'

    @classmethod
    def parse_range(cls, text: str) -> Tuple[int, int]:
        """
        Parse an inclusive range literal such as "2..5" or a single integer "3"

        Args:
            text: Range literal

        Returns:
            (lo, hi) pair, inclusive on both ends
        """
        text = text.strip()
        if '..' in text:
            lo, hi = text.split('..', 1)
            return int(lo), int(hi)
        value = int(text)
        return value, value

    @classmethod
    def crosscheck_span(cls, m: int) -> int:
        """Twist span used by crosschecks; the literal 'm' means the Lefschetz length"""
        if cls.CROSSCHECK_SPAN.strip().lower() == 'm':
            return m
        return int(cls.CROSSCHECK_SPAN)

    @classmethod
    def resolve_jobs(cls, jobs: Optional[int] = None) -> int:
        """Map a requested worker count to a usable one (0 means one per physical core)"""
        if jobs is None:
            jobs = cls.JOBS
        if jobs <= 0:
            return psutil.cpu_count(logical=False) or 1
        return jobs

    @classmethod
    def validate_config(cls) -> List[str]:
        """Validate that configuration values are usable"""
        errors = []

        for name in ('SWEEP_N', 'SWEEP_D'):
            try:
                lo, hi = cls.parse_range(getattr(cls, name))
                if lo > hi:
                    errors.append(f"SODCALC_{name} range is empty")
            except ValueError:
                errors.append(f"SODCALC_{name} must look like '2..5'")

        if cls.JOBS < 0:
            errors.append("SODCALC_JOBS must be non-negative")

        if cls.SWEEP_M_MAX < 1:
            errors.append("SODCALC_SWEEP_M_MAX must be positive")

        if cls.CROSSCHECK_SPAN.strip().lower() != 'm':
            try:
                if int(cls.CROSSCHECK_SPAN) < 0:
                    errors.append("SODCALC_CROSSCHECK_SPAN must be non-negative")
            except ValueError:
                errors.append("SODCALC_CROSSCHECK_SPAN must be an integer or 'm'")

        if cls.FAULTS_PER_CELL < 0:
            errors.append("SODCALC_FAULTS_PER_CELL must be non-negative")

        if cls.EQUIV_SEARCH_LIMIT < 1:
            errors.append("SODCALC_EQUIV_SEARCH_LIMIT must be positive")

        if cls.MAX_SCRIPT_BYTES < 1:
            errors.append("SODCALC_MAX_SCRIPT_BYTES must be positive")

        return errors
