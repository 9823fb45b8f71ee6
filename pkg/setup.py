#!/usr/bin/env python
import os
import re
import sys

from setuptools import setup


def get_version():
    here = os.path.dirname(os.path.abspath(__file__))
    filename = os.path.join(here, 'abq', '__init__.py')
    contents = open(filename).read()
    pattern = r"^__version__ = '(.*?)'$"
    return re.search(pattern, contents, re.MULTILINE).group(1)


def get_long_description():
    with open('README.md', mode='r', encoding='utf8') as f:
        return f.read()


if sys.version_info < (3, 8):
    raise RuntimeError('abq requires Python 3.8+')


setup(
    name='abq',
    version=get_version(),
    license='Apache 2',
    description='Advantage branching dueling Q-networks for multi-dimensional discrete actions',
    long_description=get_long_description(),
    long_description_content_type='text/markdown',
    packages=[
        'abq',
        'abq._numeric',
        'abq._net',
        'abq._agent',
        'abq._env',
        'abq._harness',
    ],
    keywords='reinforcement-learning dqn dueling branching action-branching numpy anyio',
    install_requires=[
        'anyio>=3.6.1,<5.0',
        'numpy>=1.22',
        'matplotlib>=3.5',
    ],
    entry_points={
        'console_scripts': ['abq = abq._cli:main'],
    },
)
