from .base import (
    available_backend_types, backend_class, default_backend_types,
    make_backend)
from .simulator import SimulatorBackend
from .toy import ToyBackend

available_backend_types
backend_class
default_backend_types
make_backend
SimulatorBackend
ToyBackend
