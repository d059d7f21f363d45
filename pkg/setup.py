import os
from setuptools import setup, find_packages


def read_file(filename):
    filepath = os.path.join(os.path.dirname(__file__), filename)
    return open(filepath, 'r').read()

setup(
    name='pulsevo',
    version='0.1.0',
    url='http://github.com/pulsevo/pulsevo',
    license='BSD',
    description=(
        'Genetic optimization of quantum memory write pulses against a '
        'pluggable fitness backend'),
    long_description=read_file('README.rst'),
    author='pulsevo developers',
    packages=find_packages(),
    include_package_data=True,
    python_requires='>=3.7',
    install_requires=[
        'numpy>=1.17',
        'scipy>=1.10',
        'jsonschema',
        # Only twisted.python.logfile and twisted.trial are used.
        'Twisted>=17.9.0',
        'confmodel',
        'PyYAML',
        'raven>=6.0.0,<7.0.0',
    ],
    entry_points='''
    [console_scripts]
    pv = pulsevo.command_line:main
    ''',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: POSIX',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    zip_safe=False
)
