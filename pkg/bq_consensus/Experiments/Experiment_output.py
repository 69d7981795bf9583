"""
The Experiment_output module contains classes to read consensus experiment
outputs back into pandas for post processing. Plotting is left to the
user's own tooling.

>>> from bq_consensus import Experiment_output
>>>
>>> rr = Experiment_output.RecordReader("fig1.jsonl")
>>> rr.summary()
>>> sw = Experiment_output.SweepReader("fig3.csv")
>>> sw.pivot('cyclic_fraction', n=20)
"""
import json
import numpy as np
import pandas as pd
import h5py as H


class RecordReader(object):
    """
    Class to load per-run JSONL record files.

    Parameters:
    ----------
    :param str filename: <>.jsonl record file

    Attributes:
    ----------
    :ivar df: (pandas DataFrame): one row per run, nested fields flattened
    """
    def __init__(self, filename):
        if not filename.endswith('.jsonl'):
            raise FileTypeError('.jsonl file must be supplied')
        records = []
        with open(filename) as f:
            for line in f:
                if line.strip():
                    records.append(json.loads(line))
        self.records = records
        self.df = pd.json_normalize(records) if records else pd.DataFrame()

    @property
    def kinds(self):
        """
        Number of runs per outcome kind
        """
        return self.df['kind'].value_counts().sort_index()

    def summary(self):
        """
        Consensus error statistics per outcome kind

        Returns:
        -------
        :return: pd.DataFrame indexed by kind with count, mean, median and
            max error, and the number of bound violations
        """
        df = self.df.copy()
        df['bound_broken'] = df['bound_ok'].map(lambda ok: ok is False)
        grouped = df.groupby('kind')
        return pd.DataFrame({'count': grouped.size(),
                             'mean_error': grouped['consensus_error'].mean(),
                             'median_error': grouped['consensus_error'].median(),
                             'max_error': grouped['consensus_error'].max(),
                             'bound_broken': grouped['bound_broken'].sum()})

    def iterative_error(self, run):
        """
        Iterative error trace of a run, when it was recorded
        """
        for record in self.records:
            if record['run'] == run:
                return np.array(record.get('iterative_error') or [])
        raise KeyError('run {} not in file'.format(run))


class SweepReader(object):
    """
    Class to load sweep CSV files (family, n, m, rho, metric, value, runs,
    seed) and reshape them.

    Parameters:
    ----------
    :param str filename: <>.csv sweep file
    """
    def __init__(self, filename):
        if not filename.endswith('.csv'):
            raise FileTypeError('.csv file must be supplied')
        self.df = pd.read_csv(filename)

    @property
    def metrics(self):
        return sorted(self.df['metric'].unique())

    def pivot(self, metric, family=None, n=None):
        """
        Table of a metric with rho as rows and (family, n) as columns

        Parameters:
        ----------
        :param str metric: metric name, e.g. 'cyclic_fraction'
        :param str family: optional family filter
        :param int n: optional node count filter

        Returns:
        -------
        :return: pd.DataFrame
        """
        df = self.df.loc[self.df['metric'] == metric]
        if family is not None:
            df = df.loc[df['family'] == family]
        if n is not None:
            df = df.loc[df['n'] == n]
        if df.empty:
            raise KeyError('no rows for metric {}'.format(metric))
        return df.pivot_table(index='rho', columns=['family', 'n'],
                              values='value')


class HDF5Reader(object):
    """
    Class to read arrays and outcome summaries from an HDF5 archive
    written by Experiment_IO.HDF5Write.

    Parameters:
    ----------
    :param str hdf5: <>.hdf5 file name
    """
    def __init__(self, hdf5):
        if not hdf5.endswith('.hdf5'):
            raise FileTypeError('.hdf5 file must be supplied')
        self.file_name = hdf5

    def keys(self):
        """
        Run names stored under results/
        """
        with H.File(self.file_name, 'r') as hdf:
            if 'results' not in hdf:
                return []
            return sorted(hdf['results'].keys(), key=int)

    def get_data(self, run, key):
        """
        Method to retrieve a stored trace array

        Parameters:
        ----------
        :param run: run index
        :param str key: 'k', 'x', 'q', 'a' (and 'call', 't' for EBQ-CADMM;
            'x', 'alpha', 'iterative_error' for CADMM)

        Returns:
        -------
        :return: np.ndarray
        """
        return self.get_data_by_path('results/{}/{}'.format(run, key))

    def get_summary(self, run):
        with H.File(self.file_name, 'r') as hdf:
            return json.loads(hdf['results/{}'.format(run)].attrs['summary'])

    def get_data_by_path(self, path):
        """
        Method to retrieve hdf5 data by specific hdf5 path

        Parameters:
        ----------
        :param str path: hdf5 directory path to data

        Returns:
        ------
        :return: data <varies>
        """
        with H.File(self.file_name, 'r') as hdf:
            return hdf[path][()]


class FileTypeError(Exception):
    pass
