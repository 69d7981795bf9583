import setuptools
from setuptools import setup

__name__ = "bq_consensus"
__version__ = "0.1"

long_description = """Simulation package for distributed average consensus over
  undirected networks when nodes can only exchange a few bits per iteration. The
  Consensus portion contains consensus ADMM, its bounded-quantizer variant BQ-CADMM with
  exact cycle detection, the range-extending EBQ-CADMM and step size selection. The
  Experiments portion contains a seeded Monte Carlo harness, rho sweeps and preset
  studies that write JSONL, CSV and HDF5 results. Error bounds and update equations
  are documented in the doc-strings."""

setup(name=__name__,
      version=__version__,
      description="Bounded-quantizer consensus ADMM simulation and experiment toolkit",
      long_description=long_description,
      install_requires=['numpy', 'scipy', 'pandas', 'h5py', 'networkx'],
      extras_require={'test': ['pytest']},
      python_requires=">=3.8",
      packages=['bq_consensus', 'bq_consensus.Network',
                'bq_consensus.Consensus', 'bq_consensus.Experiments'],
      entry_points={'console_scripts': ['bq-consensus = bq_consensus.cli:main']}
      )
