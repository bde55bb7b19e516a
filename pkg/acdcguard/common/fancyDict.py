import re
import numpy as np
import pandas as pd
from numpy.typing import ArrayLike
from typing import Iterable


class FancyDict:
    """
    an ordered set of equally long numeric columns; strings select columns,
    integers, slices and masks select rows
    """
    operations = {'==': np.equal,
                  '!=': np.not_equal,
                  '<': np.less,
                  '>': np.greater,
                  '<=': np.less_equal,
                  '>=': np.greater_equal}

    def __init__(self, data: dict | None = None) -> None:
        self.data = {}
        for key, value in (data or {}).items():
            self[key] = value

    @property
    def numRows(self) -> int:
        if not self.data:
            return 0
        return len(next(iter(self.data.values())))

    def __getitem__(self, index: str | int | slice | ArrayLike):
        if isinstance(index, str):
            return self.data[index]
        if isinstance(index, (int, np.integer)):
            return {key: value[index] for key, value in self.data.items()}
        return self._withData({key: value[index] for key, value in self.data.items()})

    def __setitem__(self, key: str, value: ArrayLike) -> None:
        value = np.asarray(value)
        assert isinstance(key, str), 'columns are set by name'
        assert value.ndim == 1, f'column {key} has to be one dimensional'
        assert not self.data or len(value) == self.numRows, f'column {key} has {len(value)} rows, the table has {self.numRows}'
        self.data[key] = value

    def _withData(self, data: dict) -> 'FancyDict':
        """
        a copy of this table (subclass attributes included) holding other rows
        """
        table = self.__class__.__new__(self.__class__)
        table.__dict__.update(self.__dict__)
        table.data = data
        return table

    def set(self, key: str, value: ArrayLike) -> None:
        """
        appends to an existing column or creates it
        """
        if key in self.data:
            self.data[key] = np.concatenate((self.data[key], np.asarray(value)))
        else:
            self[key] = value

    def where(self, *conditions: str) -> 'FancyDict':
        """
        keeps the rows that satisfy every condition, e.g. where('t >= 10', 't < 20')
        """
        mask = np.ones(self.numRows, dtype=bool)
        for condition in conditions:
            match = re.fullmatch(r'\s*(\w+)\s*(==|!=|<=|>=|<|>)\s*(.+?)\s*', condition)
            if match is None:
                raise ValueError(f'invalid condition: {condition}')
            key, op, value = match.groups()
            if key not in self.data:
                raise KeyError(f"column '{key}' does not exist")
            mask &= self.operations[op](self.data[key], float(value))
        return self._withData({key: value[mask] for key, value in self.data.items()})

    def stack(self, *columns: str) -> np.ndarray:
        """
        columns side by side as a (rows, len(columns)) matrix
        """
        for column in columns:
            if column not in self.data:
                raise KeyError(f"column '{column}' does not exist")
        if not columns:
            return np.zeros((self.numRows, 0))
        return np.column_stack([self.data[column] for column in columns])

    def asFrame(self) -> pd.DataFrame:
        return pd.DataFrame(self.data, columns=list(self.data))

    def toCsv(self, path: str) -> None:
        self.asFrame().to_csv(path, index=False, float_format='%.17g')

    @classmethod
    def fromCsv(cls, path: str) -> 'FancyDict':
        frame = pd.read_csv(path, float_precision='round_trip')
        return FancyDict({column: frame[column].to_numpy(dtype=float) for column in frame.columns})

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({list(self.data)}, rows={self.numRows})'

    def __iter__(self) -> Iterable:
        keys = list(self.data)
        for i in range(self.numRows):
            yield {key: self.data[key][i] for key in keys}

    def __len__(self) -> int:
        return self.numRows

    def __contains__(self, key: str) -> bool:
        return key in self.data

    def keys(self) -> list:
        return list(self.data.keys())

    def items(self):
        return self.data.items()

    def values(self):
        return self.data.values()

    def get(self, key: str, default=None) -> np.ndarray:
        return self.data.get(key, default)
