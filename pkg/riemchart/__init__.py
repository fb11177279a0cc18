from riemchart.errors import *
from riemchart.calculus import *
from riemchart.forms import *
from riemchart.connection import *
from riemchart.metric import *
from riemchart.geodesic import *
from riemchart.jacobi import *
