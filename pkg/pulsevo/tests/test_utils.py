import numpy as np

from pulsevo.backends.toy import ToyBackend
from pulsevo.export import (
    format_value, read_csv, write_csv, write_yaml, load_yaml)
from pulsevo.tests.helpers import PulsevoTestBase
from pulsevo.utils import (
    conjoin, deep_conjoin, derive_seed, format_float, load_class_by_string,
    omit, omit_nones, overrides)


class TestUtils(PulsevoTestBase):
    def test_conjoin(self):
        '''The result contains the keys of both dicts, the second one
        winning.'''
        a = {'foo': 1, 'bar': {'baz': 2}}
        b = {'bar': {'quux': 3}}
        self.assertEqual(conjoin(a, b), {'foo': 1, 'bar': {'quux': 3}})
        self.assertEqual(a, {'foo': 1, 'bar': {'baz': 2}})

    def test_deep_conjoin(self):
        '''Nested dicts are merged key by key.'''
        a = {'foo': 1, 'bar': {'baz': 2}}
        b = {'bar': {'quux': 3}}
        self.assertEqual(
            deep_conjoin(a, b), {'foo': 1, 'bar': {'baz': 2, 'quux': 3}})
        self.assertEqual(a, {'foo': 1, 'bar': {'baz': 2}})

    def test_omit(self):
        '''The given fields are left out.'''
        self.assertEqual(omit({'a': 1, 'b': 2, 'c': 3}, 'a', 'c'), {'b': 2})

    def test_omit_nones(self):
        '''Fields set to None are left out.'''
        self.assertEqual(omit_nones({'a': None, 'b': 0}), {'b': 0})

    def test_overrides(self):
        '''Mapped fields present in the source are copied across.'''
        target = {'a': 1}
        overrides(target, {'x': 2}, {'a': 'x', 'b': 'y'})
        self.assertEqual(target, {'a': 2})

    def test_load_class_by_string(self):
        '''Classes load from their dotted path.'''
        self.assertEqual(
            load_class_by_string('pulsevo.backends.toy.ToyBackend'),
            ToyBackend)

    def test_derive_seed(self):
        '''Derived seeds are stable, distinct per key and below 2**32.'''
        seed = derive_seed(0, 18.0, 'gaussian')
        self.assertEqual(seed, derive_seed(0, 18.0, 'gaussian'))
        self.assertNotEqual(seed, derive_seed(0, 18.0, 'freeform'))
        self.assertNotEqual(seed, derive_seed(1, 18.0, 'gaussian'))
        self.assertTrue(0 <= derive_seed(2 ** 40, 'x') < 2 ** 32)

    def test_format_float(self):
        '''Floats are written with round-trip precision.'''
        self.assertEqual(format_float(0.1 + 0.2), '0.30000000000000004')
        self.assertEqual(float(format_float(np.float64(1 / 3.0))), 1 / 3.0)


class TestExport(PulsevoTestBase):
    def test_format_value(self):
        '''Values are formatted for CSV by type.'''
        self.assertEqual(format_value(None), '')
        self.assertEqual(format_value(True), 'true')
        self.assertEqual(format_value(np.int64(3)), '3')
        self.assertEqual(format_value(np.float64(0.5)), '0.5')
        self.assertEqual(format_value('gaussian'), 'gaussian')

    def test_csv(self):
        '''CSV files carry a header and one line per row.'''
        path = self.mktemp()
        write_csv(path, ('a', 'b'), [(1, 0.25), (2, None)])
        with open(path) as f:
            self.assertEqual(f.read(), 'a,b\n1,0.25\n2,\n')
        self.assertEqual(
            read_csv(path), [{'a': '1', 'b': '0.25'}, {'a': '2', 'b': ''}])

    def test_yaml(self):
        '''YAML files are written with sorted keys and load back.'''
        path = self.mktemp()
        write_yaml(path, {'b': 1, 'a': {'c': [0.5]}})
        with open(path) as f:
            self.assertEqual(f.readline(), 'a:\n')
        self.assertEqual(load_yaml(path), {'b': 1, 'a': {'c': [0.5]}})
