from app.models.instance import Instance, Mode
from app.models.objective import objective_of_design, objective_of_weights, design_determinant
from app.models.design import FractionalDesign, Design, ConditionalExpectation

__all__ = [
    "Instance",
    "Mode",
    "objective_of_design",
    "objective_of_weights",
    "design_determinant",
    "FractionalDesign",
    "Design",
    "ConditionalExpectation"
]
