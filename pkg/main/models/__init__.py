from main.models.operators import (
    BipartiteOperator, BipartiteVector, EigenDecomposition, SchmidtDecomposition, complex_to_json)
from main.models.superoperator import ChannelProperties, KrausDecomposition, PPTVerdict, SuperOperator
from main.models.verdicts import CriterionVerdict, Status, WitnessReport, aggregate_status
from main.models.witness_spec import WitnessSpec
from main.models.matrix_file import MatrixFile
