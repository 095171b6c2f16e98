from .main import main, get_arguments
