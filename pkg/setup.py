#!/usr/bin/env python

from setuptools import find_packages, setup

setup(
    name='schwartz-dynamics',
    version='0.1.0',
    description="Dynamics and spectra of composition operators on the Schwartz space",
    packages=find_packages(exclude=('tests', 'tests.*')),
    include_package_data=True,
    package_data={
        'schwartz_dynamics': ['schema/*.json'],
    },
    install_requires=[
        'Django>=3.2',
        'numpy>=1.22',
        'scipy>=1.8',
    ],
    extras_require={
        'docs': [
            'mkdocs>=1.0,<1.1',
            'mkdocs-material>=4.6,<4.7',
        ],
        'testing': [
            'jsonschema>=4.0',
        ],
    },
    entry_points={
        'console_scripts': [
            'schwartz-dynamics=schwartz_dynamics.cli:main',
        ],
    },
    python_requires=">=3.8",
    license='BSD',
    long_description=(
        "Classification of power bounded and mean ergodic composition operators C_φ f = f∘φ "
        "on the Schwartz space S(R), with numerical orbit, Cesàro, resolvent and spectral tools"
    ),
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Framework :: Django',
        'Framework :: Django :: 3.2',
        'Framework :: Django :: 4.2',
        'Framework :: Django :: 5.0',
    ],
)
