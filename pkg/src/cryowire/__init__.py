import os

from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("cryowire")
except PackageNotFoundError:
    __version__ = "dev"


def get_data_path(filename=None):
    """
    Get the path of the packaged data directory, or of a file inside it.

    Args:
        filename (str, optional): File name inside the data directory (e.g. 'xld1000_sl.json')

    Returns:
        str: Path to the data directory or file
    """
    # A system-wide install ships its data next to the package sources
    system_path = "/opt/cryowire/src/cryowire/data"
    base = system_path if os.path.exists(system_path) else os.path.join(
        os.path.dirname(__file__), "data"
    )
    if filename is None:
        return base
    return os.path.join(base, filename)
