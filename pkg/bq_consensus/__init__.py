from .Network import Graph
from .Consensus import Quantizer
from .Consensus import CADMM
from .Consensus import BQ_CADMM
from .Consensus import EBQ_CADMM
from .Consensus import Parameter_Select

from .Experiments import Experiment_IO as eIO
from .Experiments import Experiments
from .Experiments import Experiment_output

from .nam_file import NamFile
