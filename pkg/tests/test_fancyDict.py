import numpy as np
import pytest
from acdcguard.common import FancyDict


@pytest.fixture
def table():
    return FancyDict({'t': np.arange(5) * 0.5, 'x': np.array([1.0, -2.0, 3.0, -4.0, 5.0])})


def test_columns_rows_and_masks(table):
    np.testing.assert_array_equal(table['x'], [1.0, -2.0, 3.0, -4.0, 5.0])
    assert table[1] == {'t': 0.5, 'x': -2.0}
    assert len(table[1:3]) == 2
    assert len(table[table['x'] > 0]) == 3
    assert table.numRows == 5 and len(table) == 5
    assert 'x' in table and 'y' not in table


def test_where_conditions(table):
    window = table.where('t >= 0.5', 't < 2')
    np.testing.assert_array_equal(window['x'], [-2.0, 3.0, -4.0])
    assert len(table.where()) == 5
    with pytest.raises(ValueError):
        table.where('t ~ 1')
    with pytest.raises(KeyError):
        table.where('y > 1')


def test_column_length_is_checked(table):
    with pytest.raises(AssertionError):
        table['y'] = np.zeros(3)


def test_set_appends(table):
    table.set('t', [2.5])
    assert len(table['t']) == 6
    table.set('z', np.zeros(3))
    assert 'z' in table


def test_stack(table):
    assert table.stack('t', 'x').shape == (5, 2)
    assert table.stack().shape == (5, 0)


def test_csv_keeps_full_precision(table, tmp_path):
    table['x'] = table['x'] / 3.0
    path = tmp_path / 'table.csv'
    table.toCsv(path)
    loaded = FancyDict.fromCsv(path)
    assert loaded.keys() == ['t', 'x']
    np.testing.assert_array_equal(loaded['x'], table['x'])


def test_subsets_keep_the_subclass():
    class Table(FancyDict):
        pass

    table = Table({'a': np.arange(4.0)})
    table.unit = 'Hz'
    subset = table.where('a > 1')
    assert isinstance(subset, Table) and subset.unit == 'Hz'
