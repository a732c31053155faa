from setuptools import setup, find_namespace_packages


with open('README.md', 'r', encoding='utf-8') as fh:
    readme = '\n' + fh.read()

setup(
    name='hkepler',
    version='1.0.0',
    license='MIT',
    packages=find_namespace_packages(where='src'),
    package_dir={'': 'src'},
    package_data={
        'hkepler': ['recipes/*.json']
    },
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'sympy>=1.10'
    ],
    python_requires='>=3.9',
    description='Simulation and verification engine for the nonholonomic Kepler problem on the Heisenberg group',
    long_description=readme,
    long_description_content_type='text/markdown',
    keywords=['python', 'heisenberg', 'nonholonomic', 'kepler', 'first-integrals', 'sub-riemannian'],
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Physics',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Operating System :: OS Independent',
        'License :: OSI Approved :: MIT License'
    ]
)
