from .config import MoleculeConfig, Settings, parse_config, write_config

__all__ = ['MoleculeConfig', 'Settings', 'parse_config', 'write_config']
