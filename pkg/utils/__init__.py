from .settings import ExperimentConfig, Settings, configure_logging, get_settings
from .table_io import emit, write_csv, write_json

__all__ = ['ExperimentConfig', 'Settings', 'get_settings', 'configure_logging', 'emit', 'write_csv', 'write_json']
