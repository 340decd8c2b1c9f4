#!/usr/bin/env python
"""
   Quantized network coding simulator

   qncsim simulates quantized network coding of sparse messages over random
   directed sensor network deployments. It builds the measurement matrix the
   network induces at its gateway, certifies its compressed sensing quality by
   exact tail probability integrals and restricted isometry bounds, compares it
   with Gaussian measurements and decodes the messages by l1-min recovery.

"""
import os
import sys

classifiers = """\
Development Status :: 4 - Beta
Environment :: Console
Intended Audience :: Education
Intended Audience :: Science/Research
License :: OSI Approved :: BSD License
Natural Language :: English
Operating System :: OS Independent
Programming Language :: Python :: 3
Programming Language :: Python :: 3.9
Programming Language :: Python :: 3.10
Programming Language :: Python :: 3.11
Programming Language :: Python :: 3.12
Topic :: Scientific/Engineering :: Mathematics
Topic :: System :: Networking
"""

def howto_install_setuptools():
    print("""
   Error: You need setuptools Python package!

   It's very easy to install it, just type:

   pip install setuptools

   Then you could make eggs from this package.
""")

try:
    from setuptools import setup
except ImportError:
    howto_install_setuptools()
    sys.exit(1)

params = {
    'install_requires': [ 'numpy>=1.22', 'scipy>=1.9', 'networkx>=2.6' ],
    'extras_require': {
        'proctitle': [ 'setproctitle>=1.1.8' ],
        'test':      [ 'pytest>=7' ],
    },
    'python_requires': '>=3.9',
    'zip_safe': False  # log configuration files are read from the package directory
}

doclines = [ x.strip() for x in __doc__.split('\n') if x ]

params.update( {
    'name': 'qncsim',
    'version': open(os.path.join('qncsim', '__init__.py')).read().split('\'')[1],
    'description': doclines[0],
    'long_description': ' '.join(doclines[1:]),
    'maintainer': 'qncsim developers',
    'author': 'qncsim developers',
    'license': 'BSD',
    'platforms': ['any'],
    'classifiers': [ x for x in classifiers.split('\n') if x ],
    'scripts':  [ 'scripts/qncsim.py' ],
    'packages': [ 'qncsim', 'qncsim.grammar' ]
} )

# install default log configuration files
params['package_data'] = {}
params['package_data']['qncsim'] = [ 'qncsim-log-syslog.conf', 'qncsim-log-console.conf' ]

# install tests as data_files
params['data_files'] = []
for root,_,filenames in os.walk('tests'):
    if '__pycache__' in root:
        continue
    target_root= 'share/qncsim/' + '/'.join(os.path.split(root))
    for filename in filenames:
        params['data_files'].append(
            # path must be in independant format: "/" separator
            ( target_root, [ os.path.join(root,filename) ] )
        )

setup(**params)
