"""Instance file storage."""

from src.integrations.matrix_files import instance_filename, read_instance, write_instance

__all__ = ['read_instance', 'write_instance', 'instance_filename']
