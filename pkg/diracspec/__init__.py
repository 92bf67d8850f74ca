from .objects import *
from .components import *
