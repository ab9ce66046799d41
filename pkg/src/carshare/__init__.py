"""Solvers for the two-station one-way car-sharing customer
satisfaction problem: exact branch and bound over a flow-based MIP,
relaxation-guided metaheuristics, network preprocessing, and benchmark
instance tooling."""

from .instance import (Customer, Demand, Instance, InstanceFormatError,
                       Solution, generate_fc, generate_ft, generate_st,
                       make_instance, read_instance, write_instance)

__all__ = [
    "Customer", "Demand", "Instance", "InstanceFormatError", "Solution",
    "generate_fc", "generate_ft", "generate_st", "make_instance",
    "read_instance", "write_instance",
]

__version__ = "0.1.0"
