from .cache_service import CacheService, cache_load, cache_store
from .report_service import ReportService
from .verification_service import VerificationService

__all__ = ['CacheService', 'cache_load', 'cache_store', 'ReportService', 'VerificationService']
