// placeholder — acceptance suite lands after the runner is proven
