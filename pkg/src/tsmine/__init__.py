"""Time-series mining for air handling unit sensor logs.

Smoothing and descriptive statistics, PAA/SAX symbolic reduction, a
from-scratch SMO soft-margin SVM with one-vs-one voting, and a cross-validated
evaluation harness.
"""

from .errors import DegenerateDataError, InputError, TsmineError
from .timeseries import TimeSeries

__version__ = "0.1.0"

__all__ = ["TimeSeries", "TsmineError", "InputError", "DegenerateDataError", "__version__"]
